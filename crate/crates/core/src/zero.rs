//! The Riemann-Siegel theta function, the Hardy Z function, and certified
//! Newton refinement of zeros of Z on the critical line.
//!
//! With `theta(t) = Im log Gamma(1/4 + it/2) - t log(pi)/2`, the function
//! `Z(t) = exp(i theta(t)) zeta(1/2 + it)` is real for real t and vanishes
//! exactly where zeta vanishes on the critical line. A sign change of Z
//! across a bracket therefore certifies a zero inside it, and Newton
//! iteration on Z sharpens the bracket to any requested precision while
//! keeping the zero enclosed at every step.

use crate::ball::RealBall;
use crate::bigfloat::{BigFloat, Rounding};
use crate::complex::ComplexBall;
use crate::elem::{log_ball, pi_ball};
use crate::error::{Error, Result};
use crate::gamma::log_gamma_jet;
use crate::series::{BallSeries, RealSeries};
use crate::zeta::{ceil_log2, zeta_jet, JetOptions};
use std::cmp::Ordering;

/// Order-d jet of `theta(t+x)`: the imaginary part of the log-gamma jet at
/// `1/4 + i(t+x)/2` minus `log(pi)/2 (t+x)`.
pub fn theta_jet(t: &RealBall, d: usize, prec: u32) -> RealSeries {
    assert!(d >= 1);
    let wp = prec + 16 + ceil_log2(d as u64 + 1);
    let z0 = ComplexBall::new(RealBall::from_ratio(1, 4, wp), t.mul_2exp(-1));
    let g = log_gamma_jet(&z0, d, wp);
    // Substitute x -> (i/2) x, then keep the imaginary part: the increment
    // of the gamma argument per unit of t is i/2.
    let mut scale = ComplexBall::one();
    let mut out = Vec::with_capacity(d);
    for k in 0..d {
        let c = g.coeff(k).mul(&scale, wp);
        out.push(c.im);
        scale = scale.mul_i().mul_2exp(-1);
    }
    let lp_half = log_ball(&pi_ball(wp), wp).mul_2exp(-1);
    out[0] = out[0].sub(&lp_half.mul(t, wp), wp);
    if d > 1 {
        out[1] = out[1].sub(&lp_half, wp);
    }
    RealSeries::from_coeffs(out.into_iter().map(|b| b.round_to(prec + 8)).collect())
}

/// Enclosure of `theta(t)`.
pub fn theta(t: &RealBall, prec: u32) -> RealBall {
    theta_jet(t, 1, prec).coeff(0)
}

/// Order-d jet of the Hardy Z function at t. The result is provably real:
/// the imaginary parts of the assembled coefficients are checked to contain
/// zero and then dropped.
pub fn hardy_z_jet(t: &RealBall, d: usize, prec: u32, workers: usize) -> Result<RealSeries> {
    assert!(d >= 1);
    let wp = prec + 16 + ceil_log2(d as u64 + 1);
    let th = theta_jet(t, d, wp);

    // zeta(1/2 + i(t+x)): jet at s0 = 1/2 + it with coefficients times i^k.
    let s0 = ComplexBall::new(RealBall::from_ratio(1, 2, wp), t.clone());
    let opts = JetOptions { workers, force: None };
    let zj = zeta_jet(&s0, d, wp, false, &opts)?;
    let mut ipow = ComplexBall::one();
    let mut zc = Vec::with_capacity(d);
    for k in 0..d {
        zc.push(zj.jet.coeff(k).mul(&ipow, wp));
        ipow = ipow.mul_i();
    }
    let zf = BallSeries::from_coeffs(zc);

    let ith = BallSeries::from_coeffs(
        th.coeffs()
            .iter()
            .map(|c| ComplexBall::new(RealBall::zero(), c.clone()))
            .collect(),
    );
    let z = ith.exp(d, wp).mul(&zf, d, wp);

    let mut out = Vec::with_capacity(d);
    for k in 0..d {
        let c = z.coeff(k);
        if !c.im.contains_zero() {
            return Err(Error::Internal(format!(
                "Hardy Z jet coefficient {k} has nonreal enclosure"
            )));
        }
        out.push(c.re.round_to(prec + 8));
    }
    Ok(RealSeries::from_coeffs(out))
}

/// Enclosure of `Z(t)`.
pub fn hardy_z(t: &RealBall, prec: u32, workers: usize) -> Result<RealBall> {
    Ok(hardy_z_jet(t, 1, prec, workers)?.coeff(0))
}

/// A bracket `[lo, hi]` believed to isolate one simple zero of Z.
#[derive(Clone, Debug)]
pub struct IsolatingInterval {
    pub lo: BigFloat,
    pub hi: BigFloat,
}

impl IsolatingInterval {
    pub fn new(lo: BigFloat, hi: BigFloat) -> Self {
        IsolatingInterval { lo, hi }
    }
}

/// Quadratic-convergence context: over a fixed interval X containing the
/// zero, `|Z''| / (2 |Z'|) <= c`, so one Newton step from any point of X
/// maps the enclosure radius eps to at most `c eps^2` plus evaluation error.
struct NewtonContext {
    /// Upper bound for sup |Z''/2| / inf |Z'| over the initial bracket.
    c: BigFloat,
    /// ceil(log2(c)), used to pick evaluation precisions.
    log2_c: i64,
}

/// Intersection of two overlapping balls; `None` when disjoint.
fn intersect(a: &RealBall, b: &RealBall) -> Option<RealBall> {
    let p = (a.mid().mant_bits().max(b.mid().mant_bits()) as u32).max(64) + 8;
    let (alo, ahi) = (a.lo(p), a.hi(p));
    let (blo, bhi) = (b.lo(p), b.hi(p));
    let lo = if alo.cmp_value(&blo) == Some(Ordering::Greater) { alo } else { blo };
    let hi = if ahi.cmp_value(&bhi) == Some(Ordering::Less) { ahi } else { bhi };
    if lo.cmp_value(&hi) == Some(Ordering::Greater) {
        return None;
    }
    Some(RealBall::from_endpoints(&lo, &hi, p))
}

fn sign_of_z(t: &BigFloat, workers: usize, max_prec: u32) -> Result<Option<Ordering>> {
    let point = RealBall::exact(t.clone());
    let mut p = 64;
    while p <= max_prec {
        let z = hardy_z(&point, p, workers)?;
        if z.is_positive() {
            return Ok(Some(Ordering::Greater));
        }
        if z.is_negative() {
            return Ok(Some(Ordering::Less));
        }
        p *= 2;
    }
    Ok(None)
}

/// Shrinks `[lo, hi]` by sign-preserving bisection until the order-3 jet of
/// Z over the whole interval separates Z' from zero, returning the interval
/// ball and the jet. Needed because enclosures over a wide interval carry
/// wrapping error proportional to the width.
fn contract_until_separated(
    lo: &BigFloat,
    hi: &BigFloat,
    sl: Ordering,
    workers: usize,
) -> Result<(RealBall, RealSeries)> {
    let mut lo = lo.clone();
    let mut hi = hi.clone();
    'outer: for _ in 0..64 {
        let b = RealBall::from_endpoints(&lo, &hi, 96);
        let jet = hardy_z_jet(&b, 3, 96, workers)?;
        let c1 = jet.coeff(1);
        // Demand Z' known to better than 12.5% relative accuracy, not mere
        // separation: the curvature ratio built from a marginal enclosure
        // would be uselessly loose.
        let tight = match (c1.rad().msb_exp(), c1.mid().msb_exp()) {
            (None, Some(_)) => true,
            (Some(re), Some(me)) => re + 4 <= me,
            _ => false,
        };
        if tight && c1.lower_abs().is_positive() {
            return Ok((b, jet));
        }
        // Split near the middle; fall back to lopsided cuts if the sign at
        // the cut point cannot be decided cheaply (cut too close to the zero).
        let wp = 32 + lo.mant_bits().max(hi.mant_bits()) as u32;
        let width = hi.sub(&lo, wp, Rounding::Nearest).0;
        for (p, q) in [(1u64, 2u64), (5, 11), (6, 11)] {
            let off = width
                .mul(&BigFloat::from_i64(p as i64), wp, Rounding::Nearest)
                .0
                .div_u64(q, wp, Rounding::Nearest)
                .0;
            let m = lo.add(&off, wp, Rounding::Nearest).0;
            if m.cmp_value(&lo) != Some(Ordering::Greater)
                || m.cmp_value(&hi) != Some(Ordering::Less)
            {
                continue;
            }
            if let Some(sm) = sign_of_z(&m, workers, 512)? {
                if sm == sl {
                    lo = m;
                } else {
                    hi = m;
                }
                continue 'outer;
            }
        }
        return Err(Error::RefineFailed(
            "cannot determine the sign of Z at any bisection point".into(),
        ));
    }
    Err(Error::RefineFailed(
        "Z' is not separated from zero over the bracket".into(),
    ))
}

/// Refines a bracketed simple zero of Z to radius below `2^-prec`.
///
/// Certification chain: a sign change over the bracket proves existence;
/// every Newton step is checked to stay inside the previous enclosure, so
/// the zero never escapes; the final interval is verified to map to an
/// enclosure of Z containing zero.
pub fn refine_zero(iv: &IsolatingInterval, prec: u32, workers: usize) -> Result<RealBall> {
    if iv.lo.cmp_value(&iv.hi) != Some(Ordering::Less) {
        return Err(Error::InvalidInput("empty or invalid bracket".into()));
    }
    if !iv.lo.is_finite() || !iv.hi.is_finite() {
        return Err(Error::InvalidInput("bracket endpoints must be finite".into()));
    }

    // Existence: opposite signs at the endpoints.
    let sl = sign_of_z(&iv.lo, workers, 4096)?.ok_or_else(|| {
        Error::RefineFailed("cannot determine the sign of Z at the lower endpoint".into())
    })?;
    let sh = sign_of_z(&iv.hi, workers, 4096)?.ok_or_else(|| {
        Error::RefineFailed("cannot determine the sign of Z at the upper endpoint".into())
    })?;
    if sl == sh {
        return Err(Error::RefineFailed(
            "no sign change of Z across the bracket".into(),
        ));
    }

    // Contraction context over an interval that still brackets the zero.
    let (b0, jet) = contract_until_separated(&iv.lo, &iv.hi, sl, workers)?;
    let c1_low = jet.coeff(1).lower_abs();
    let c_up = jet.coeff(2).upper_abs().div(&c1_low, 32, Rounding::Up).0;
    let ctx = NewtonContext {
        log2_c: c_up.msb_exp().unwrap_or(0) + 1,
        c: c_up,
    };

    let target = BigFloat::pow2(-(prec as i64));
    let mut x = b0;
    for _ in 0..64 {
        if x.rad().cmp_value(&target) != Some(Ordering::Greater) {
            // Certification: Z over the final interval encloses zero.
            let z = hardy_z(&x, prec + 24, workers)?;
            if !z.contains_zero() {
                return Err(Error::Internal(
                    "final certification failed: Z(enclosure) excludes zero".into(),
                ));
            }
            return Ok(x);
        }

        let acc_bits = (-x.rad().msb_exp().unwrap_or(0)).max(1);
        let p = (2 * acc_bits + ctx.log2_c + 32).clamp(64, prec as i64 + 32) as u32;

        // Newton step from (a rounding of) the midpoint.
        let m = {
            let r = x.mid().round(p, Rounding::Nearest).0;
            if x.contains_bf(&r) {
                r
            } else {
                x.mid().clone()
            }
        };
        let m_ball = RealBall::exact(m);
        let j = hardy_z_jet(&m_ball, 2, p, workers)?;
        let step = j.coeff(0).div(&j.coeff(1), p);
        let moved = m_ball.sub(&step, p);

        // Mean value form: the zero r satisfies
        //   r = m - Z(m)/Z'(m) - (Z''(xi) / 2 Z'(m)) (r - m)^2, xi in x,
        // so `moved` plus the curvature term c * sup|r - m|^2 encloses r.
        let eps = x.sub(&m_ball, 64).upper_abs();
        let quad = ctx
            .c
            .mul(&eps, 32, Rounding::Up)
            .0
            .mul(&eps, 32, Rounding::Up)
            .0;
        let next = moved.add_error(&quad);

        // Both x and next contain the zero, so their intersection does too.
        let clipped = intersect(&next, &x).ok_or_else(|| {
            Error::Internal("Newton enclosure is disjoint from the bracket".into())
        })?;
        if clipped.rad().cmp_value(x.rad()) != Some(Ordering::Less) {
            return Err(Error::RefineFailed(
                "Newton iteration stopped contracting".into(),
            ));
        }
        x = clipped;
    }
    Err(Error::RefineFailed(
        "Newton iteration did not reach the target precision".into(),
    ))
}
